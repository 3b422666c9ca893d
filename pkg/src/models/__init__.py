"""Data models."""