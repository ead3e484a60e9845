"""Core components: configuration, errors, matrix helpers and the sensor model."""
