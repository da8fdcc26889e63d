"""Test suite for the orthogonal NMF benchmark."""
