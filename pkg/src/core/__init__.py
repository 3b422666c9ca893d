"""Inference, evaluation and analysis modules."""