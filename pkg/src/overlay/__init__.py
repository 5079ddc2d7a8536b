# Overlay graph module
