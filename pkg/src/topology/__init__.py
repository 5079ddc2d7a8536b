# Topology generation module
