# Report models
