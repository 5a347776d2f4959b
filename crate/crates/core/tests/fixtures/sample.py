# greet
def greet(name='x'):
    """Doc."""
    return f"hi {name}" if name else None
print(greet() * 2 ** 3.5e1)
