"""Test suite for the BlazeFace desk stack."""