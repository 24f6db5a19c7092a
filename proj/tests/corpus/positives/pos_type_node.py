def render_node(node, out):
    if type(node) == str:
        out.write(node)
        return True
    return False
