# Self-healing P2P overlay simulator
