"""Runnable entry points: the qahd command line and the acceptance battery."""
