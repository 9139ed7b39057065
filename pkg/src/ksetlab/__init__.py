"""Workbench for k-set agreement bounds on directed networks."""
