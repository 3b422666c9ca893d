"""Utility modules."""