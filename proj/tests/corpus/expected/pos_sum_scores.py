def score_sum(scores, offset):
    acc = sum(scores)
    return acc + offset
