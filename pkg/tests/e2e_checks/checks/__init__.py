"""Extra checks loaded with --checks-path by the end-to-end tests."""
