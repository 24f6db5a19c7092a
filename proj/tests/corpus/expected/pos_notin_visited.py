def visit(target, visited):
    if target not in visited:
        visited.add(target)
        return True
    return False
