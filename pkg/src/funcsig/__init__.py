"""Kernel smoothing significance test for functional covariates."""
