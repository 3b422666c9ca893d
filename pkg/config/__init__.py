"""Configuration package for the BlazeFace desk stack."""