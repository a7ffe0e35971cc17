"""Package identity constants (kept import-light for the manifest writer)."""

NAME = "ruviz"
VERSION = "0.1.0"
