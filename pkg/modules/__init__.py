"""
Toolkit modules package: algebra, signals, decomposition, jumps, transforms, oracle and CLI
"""
