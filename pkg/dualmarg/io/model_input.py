# Licensed under an MIT open source license - see LICENSE

import json

import numpy as np

from ..exceptions import ValidationError
from ..models.graph import build_graph
from ..models.factors import ModelParams, model_factors


__all__ = ['ModelInput', 'load_model', 'make_couplings', 'make_fields',
           'random_kinds']


random_kinds = ("constant", "halfnormal", "uniform")

# Stream offsets of one seed: 0 drives samplers, 1 couplings, 2 fields.
coupling_stream = 1
field_stream = 2


def _stream(seed, jump):
    return np.random.Generator(np.random.Philox(seed).jumped(jump))


def _draw(spec, size, seed, jump, name):

    if isinstance(spec, bool):
        raise ValidationError("{} must be a number, an array or a random "
                              "specification.".format(name))

    if isinstance(spec, (int, float)):
        return np.full(size, float(spec))

    if isinstance(spec, (list, tuple, np.ndarray)):
        values = np.asarray(spec, dtype=float).ravel()
        if values.size != size:
            raise ValidationError("Expected {0} {1}. Found {2}"
                                  .format(size, name, values.size))
        return values

    if not isinstance(spec, dict):
        raise ValidationError("{} must be a number, an array or a random "
                              "specification.".format(name))

    kind = spec.get("kind")
    if kind not in random_kinds:
        raise ValidationError("Unknown {0} kind {1}. Must be one of {2}"
                              .format(name, kind, random_kinds))

    required = {"constant": ("value",), "halfnormal": ("sigma2",),
                "uniform": ("min", "max")}[kind]
    missing = [key for key in required if key not in spec]
    if missing:
        raise ValidationError("A {0} {1} specification needs {2}."
                              .format(kind, name, ", ".join(missing)))

    if kind == "constant":
        return np.full(size, float(spec["value"]))

    seed = spec.get("seed", seed)
    rng = _stream(seed, jump)

    if kind == "halfnormal":
        sigma2 = float(spec["sigma2"])
        if sigma2 < 0:
            raise ValidationError("sigma2 must be nonnegative. Found {}"
                                  .format(sigma2))
        return np.abs(rng.normal(0., np.sqrt(sigma2), size=size))

    low = float(spec["min"])
    high = float(spec["max"])
    if not high > low:
        raise ValidationError("A uniform specification needs max > min. "
                              "Found [{0}, {1}]".format(low, high))
    return low + (high - low) * rng.random(size)


def make_couplings(spec, n_edges, seed=0):
    '''
    Per-edge couplings from a number, a per-edge array or a random
    specification ``{"kind": "halfnormal", "sigma2": s}`` (draws
    ``|z|``, ``z ~ N(0, s)``) or ``{"kind": "uniform", "min": a,
    "max": b}``.
    '''
    return _draw(spec, int(n_edges), seed, coupling_stream, "couplings")


def make_fields(spec, n_vertices, seed=0):
    '''
    Per-vertex fields; the vertex analog of `make_couplings`.
    '''
    return _draw(spec, int(n_vertices), seed, field_stream, "fields")


class ModelInput(object):
    """
    A model read from a JSON description.

    Attributes
    ----------
    graph : `~dualmarg.models.Graph`
    params : `~dualmarg.models.ModelParams`
    seed : int
    """

    def __init__(self, graph, params, seed=0, source=None):
        self.graph = graph
        self.params = params
        self.seed = seed
        self.source = source

    @classmethod
    def from_dict(cls, description, seed=None):
        '''
        Build from a dictionary with keys ``graph``, ``model``, ``q``,
        ``couplings``, ``fields`` and ``seed``. ``seed`` overrides the
        stored seed.
        '''

        if not isinstance(description, dict):
            raise ValidationError("A model description must be a JSON "
                                  "object.")
        for key in ("graph", "couplings"):
            if key not in description:
                raise ValidationError("The model description needs a '{}' "
                                      "entry.".format(key))

        graph = build_graph(description["graph"])

        model = description.get("model", "ising")
        q = int(description.get("q", 2))
        if seed is None:
            seed = int(description.get("seed", 0))

        couplings = make_couplings(description["couplings"],
                                   graph.edge_count, seed=seed)
        fields = make_fields(description.get("fields", 0.),
                             graph.vertex_count, seed=seed)

        params = ModelParams(couplings, fields, q=q, model=model)
        params.validate(graph)

        return cls(graph, params, seed=seed, source=description)

    def factors(self):
        return model_factors(self.graph, self.params)

    def __repr__(self):
        return "ModelInput({0}, {1}, seed={2})".format(self.graph,
                                                      self.params, self.seed)


def load_model(source, seed=None):
    '''
    Read a model from a JSON file, a JSON string or a dictionary.

    Returns
    -------
    model : `ModelInput`
    '''

    if isinstance(source, dict):
        return ModelInput.from_dict(source, seed=seed)

    try:
        with open(source, 'r') as input_file:
            description = json.load(input_file)
    except (OSError, TypeError):
        try:
            description = json.loads(source)
        except (TypeError, ValueError):
            raise ValidationError("Cannot read a model from {}."
                                  .format(source))
    except ValueError as err:
        raise ValidationError("Invalid JSON in {0}: {1}".format(source, err))

    return ModelInput.from_dict(description, seed=seed)
