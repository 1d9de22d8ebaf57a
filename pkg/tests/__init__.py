"""Test suite for the leakage analyzer."""
