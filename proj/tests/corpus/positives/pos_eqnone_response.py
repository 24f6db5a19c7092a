def unwrap(response, default):
    if response == None:
        return default
    return response.body
