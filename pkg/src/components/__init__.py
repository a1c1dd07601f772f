"""Core component package: spin algebra, setups, compiler, simulator, verification."""
