# Test package for completedcoh
