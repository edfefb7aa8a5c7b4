# Copyright (c) blochzak contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for
# license information.
###############################################################################

"""
Run configuration, thread pool and deterministic output writers.
"""

import os
import json
import copy
import pathlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np


THREADS_ENV = 'BLOCHZAK_THREADS'

TOLERANCE_PROFILES = {
    'strict': {'eig': 1e-8, 'refine': 1e-8, 'zak': 1e-12, 'kernel': 1e-8, 'scaling': 1e-6, 'homog': 1e-8},
    'default': {'eig': 1e-8, 'refine': 1e-8, 'zak': 1e-12, 'kernel': 1e-8, 'scaling': 1e-6, 'homog': 1e-8},
    'loose': {'eig': 1e-6, 'refine': 1e-6, 'zak': 1e-10, 'kernel': 1e-6, 'scaling': 1e-4, 'homog': 1e-6},
}

DEFAULTS = {
    'preset': None,
    'operator': None,
    'K': 16,
    'G': 32,
    'Q': 64,
    'W': 4,
    'P': 8,
    't': 1.0,
    't_list': [0.25, 1.0],
    'm_list': [1, 2, 4, 8],
    'N_list': [4, 8, 16, 32],
    'N': 2,
    'n_max': None,
    'n_show': 6,
    'theta': 0.0,
    'M': None,
    'v': 1.0,
    'b': 0.25,
    'out': 'blochzak_out',
    'formats': ['csv', 'json'],
    'threads': None,
    'tolerance_profile': 'default',
}

_POSITIVE = ('K', 'G', 'Q', 'W', 'P', 't', 'N', 'n_show', 'v', 'b')


def default_threads():
    value = os.environ.get(THREADS_ENV)
    if not value:
        return 1
    try:
        n = int(value)
    except ValueError:
        raise ValueError("{} must be an integer, got '{}'".format(THREADS_ENV, value))
    return max(1, n)


def parallel_map(func, items, threads=None):
    """
    map() over a thread pool; results come back in input order.
    """
    threads = threads or default_threads()
    if threads <= 1 or len(items) <= 1:
        return [func(_x) for _x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


class RunConfig:
    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(DEFAULTS)
        if unknown:
            raise ValueError("unknown configuration keys: {}".format(', '.join(sorted(unknown))))
        values = copy.deepcopy(DEFAULTS)
        values.update({_k: _v for _k, _v in kwargs.items() if _v is not None})
        self._values = values
        self._check()

    def _check(self):
        for key in _POSITIVE:
            if self._values[key] is not None and not self._values[key] > 0:
                raise ValueError("configuration value {} must be positive, got {}".format(key, self._values[key]))
        for key in ('t_list', 'm_list', 'N_list'):
            if any(not _x > 0 for _x in self._values[key]):
                raise ValueError("configuration list {} must hold positive values".format(key))
        if self._values['tolerance_profile'] not in TOLERANCE_PROFILES:
            raise ValueError("unknown tolerance profile '{}', choose from {}".format(
                self._values['tolerance_profile'], ', '.join(TOLERANCE_PROFILES)))
        if self._values['threads'] is not None and int(self._values['threads']) < 1:
            raise ValueError("threads must be at least 1")
        if self._values['preset'] is not None and self._values['operator'] is not None:
            raise ValueError("give either a preset or an inline operator, not both")

    @classmethod
    def from_file(cls, path, **overrides):
        with open(path) as f:
            values = json.load(f)
        values.update({_k: _v for _k, _v in overrides.items() if _v is not None})
        return cls(**values)

    def __getattr__(self, key):
        if key.startswith('_'):
            raise AttributeError(key)
        try:
            return self._values[key]
        except KeyError:
            raise AttributeError(key)

    @property
    def tolerances(self):
        return TOLERANCE_PROFILES[self._values['tolerance_profile']]

    @property
    def thread_count(self):
        return int(self._values['threads']) if self._values['threads'] else default_threads()

    def to_dict(self):
        return copy.deepcopy(self._values)


def operator_from_dict(data):
    """
    Operator spec from its JSON form; fields are {"real": bool, "terms": [[k, re, im], ...]}.
    """
    from ._coeffs import CoefficientField, OperatorSpec

    dim = int(data['dimension'])

    def _field(obj):
        if obj is None:
            return None
        if isinstance(obj, (int, float)):
            return obj
        terms = [(tuple(np.atleast_1d(_k).tolist()), complex(_re, _im)) for _k, _re, _im in obj.get('terms', [])]
        if not terms:
            return None
        return CoefficientField.from_terms(dim, terms, real=obj.get('real', False))

    principal = data['principal']
    principal = [[_field(principal[i][j]) for j in range(dim)] for i in range(dim)]
    first = data.get('first_order')
    if first is not None:
        first = ([_field(_x) for _x in first[0]], [_field(_x) for _x in first[1]])
    return OperatorSpec(dim, principal, first, _field(data.get('zeroth')),
                        self_adjoint=data.get('self_adjoint', False),
                        pure_second_order=data.get('pure_second_order'))


def resolve_operator(config):
    from ._presets import get_preset

    if config.operator is not None:
        return operator_from_dict(config.operator)
    if config.preset is None:
        raise ValueError("no operator given: set 'preset' or 'operator'")
    return get_preset(config.preset)


def fmt(x):
    return '%.15g' % x


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(_k): jsonable(_v) for _k, _v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(_x) for _x in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating, float)):
        return float(fmt(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


class OutputBundle:
    """
    Writes CSV/JSON result files into one directory; every JSON file embeds the config.
    """

    def __init__(self, out_dir, config, formats=('csv', 'json')):
        self.out_dir = pathlib.Path(out_dir)
        self.config = config
        self.formats = tuple(formats)
        self.written = []

    def _path(self, name):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        self.written.append(str(path))
        return path

    def write_json(self, name, payload):
        if 'json' not in self.formats:
            return None
        body = {'config': self.config.to_dict() if hasattr(self.config, 'to_dict') else self.config}
        body.update(payload)
        path = self._path(name)
        with open(path, 'w') as f:
            json.dump(jsonable(body), f, indent=2, sort_keys=True)
            f.write('\n')
        return path

    def write_csv(self, name, header, rows):
        if 'csv' not in self.formats:
            return None
        path = self._path(name)
        with open(path, 'w') as f:
            f.write(','.join(header) + '\n')
            for row in rows:
                f.write(','.join(fmt(_x) if isinstance(_x, (float, np.floating)) else str(_x) for _x in row) + '\n')
        return path
