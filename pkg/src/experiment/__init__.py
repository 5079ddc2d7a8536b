# Experiment module
