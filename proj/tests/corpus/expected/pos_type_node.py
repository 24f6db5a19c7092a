def render_node(node, out):
    if isinstance(node, str):
        out.write(node)
        return True
    return False
