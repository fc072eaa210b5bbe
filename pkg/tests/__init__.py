# Test package for fillcheck
