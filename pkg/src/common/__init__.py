"""Common models, errors, configuration and documents."""
