"""Orthogonal NMF Benchmark - Main Package"""
