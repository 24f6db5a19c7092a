def visit(target, visited):
    if not target in visited:
        visited.add(target)
        return True
    return False
