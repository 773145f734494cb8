"""
Iteration coordinates of training runs.

A coordinate alternates level names and iteration tuples, e.g.
``['Eval', (1,), 'ExtractorTrainer', (0, 4)]``, and formats as
``Eval/1/ExtractorTrainer/0-4``.
"""

LEVEL_SEPARATOR = '/'
ITERATION_SEPARATOR = '-'


def create_local_meta(metadata, name):
    """
    Creates the metadata dictionary of a new execution level and registers
    it under the current iteration of its parent.

    Args
    ----
    metadata : dict
        Metadata of the parent level, or None for a top level driver.

    name : str
        Name of the new level.

    Returns
    -------
    dict
        ``{'name': name, 'coord': parent coordinate + [name, (0,)]}``
    """
    parent_coord = [] if metadata is None else list(metadata['coord'])
    local_meta = {'name': name, 'coord': parent_coord + [name, (0,)]}
    if metadata is not None:
        metadata.setdefault(parent_coord[-1], {})[name] = local_meta
    return local_meta


def update_local_meta(local_meta, iteration):
    """
    Moves a level to a new iteration, e.g. (epoch, step). Only the current
    iteration keeps a slot for the levels nested under it.
    """
    iteration = tuple(iteration)
    previous = local_meta['coord'][-1]
    if previous != iteration:
        local_meta.pop(previous, None)
    local_meta['coord'][-1] = iteration
    local_meta.setdefault(iteration, {})


def format_iteration_coordinate(coord):
    """
    Human-readable form of a coordinate, e.g. ``['AudioTrainer', (3, 17)]``
    becomes ``AudioTrainer/3-17``.
    """
    parts = []
    for name, iteration in zip(coord[::2], coord[1::2]):
        parts.append(name)
        parts.append(ITERATION_SEPARATOR.join(str(i) for i in iteration))
    return LEVEL_SEPARATOR.join(parts)
