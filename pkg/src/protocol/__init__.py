# Protocol engine module
