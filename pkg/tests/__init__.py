# Test package for mixed_precision
