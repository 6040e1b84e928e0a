"""
Worked examples: the four product zeros of the flip, the conjugate-trace
minima, the trace of the generalized Robertson maps and the weak-optimality
counterexample.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
import pandas as pd

from main import choi, criteria, tensor_core, unitary_opt, witnesses
from main.errors import ValidationError
from main.models.operators import BipartiteOperator, BipartiteVector
from main.models.verdicts import to_plain

logger = logging.getLogger(__name__)

# 16·ρ for the equal mixture of the four product zeros of F on 2⊗2.
FLIP_ZERO_STATE_16 = np.array([
    [2, -1 + 1j, 1 - 1j, 0],
    [-1 - 1j, 6, -2, 1 - 1j],
    [1 + 1j, -2, 6, -1 + 1j],
    [0, 1 + 1j, -1 - 1j, 2],
])


@dataclass
class DemoResult:
    name: str
    title: str
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    facts: Dict[str, object] = field(default_factory=dict)
    verdicts: List[object] = field(default_factory=list)

    def render(self):
        lines = [self.title, '']
        for label, table in self.tables.items():
            lines.append(f'{label}:')
            lines.append(table.to_string())
            lines.append('')
        for key, value in self.facts.items():
            lines.append(f'{key}: {value}')
        lines.extend(verdict.summary_line() for verdict in self.verdicts)
        return '\n'.join(lines)

    def json(self):
        return {
            'name': self.name,
            'title': self.title,
            'tables': {label: table.to_dict(orient='records') for label, table in self.tables.items()},
            'facts': to_plain(self.facts),
            'verdicts': [verdict.json() for verdict in self.verdicts],
        }


def _format_complex(z, digits=6):
    z = complex(np.round(z, digits))
    if z.imag == 0:
        return f'{z.real:g}'
    return f'{z.real:g}{z.imag:+g}i'


def _complex_frame(matrix):
    return pd.DataFrame([[_format_complex(z) for z in row] for row in matrix])


def flip_product_zeros():
    """
    |01⟩, |10⟩, |+−⟩ and |RL⟩, normalized.
    """
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    right = np.array([1, 1j]) / np.sqrt(2)
    left = np.array([1, -1j]) / np.sqrt(2)
    e0, e1 = np.eye(2)
    pairs = {'|01⟩': (e0, e1), '|10⟩': (e1, e0), '|+−⟩': (plus, minus), '|RL⟩': (right, left)}
    return {label: BipartiteVector(2, 2, np.kron(x, y)) for label, (x, y) in pairs.items()}


def flip_zero_state():
    zeros = flip_product_zeros()
    rho = sum(z.projector().matrix for z in zeros.values()) / len(zeros)
    return BipartiteOperator(2, 2, rho), zeros


def product_zeros_demo(config=None):
    config = config or criteria.CriteriaConfig()
    F = tensor_core.flip_operator(2)
    rho, zeros = flip_zero_state()
    decomposition = [(1 / len(zeros), z) for z in zeros.values()]
    verdict = criteria.spanning_from_separable_state(F, rho, decomposition, config)
    zero_table = pd.DataFrame({
        'zero': list(zeros),
        'coordinates': [', '.join(_format_complex(c) for c in z.coords * 2) + ' (×1/2)' for z in zeros.values()],
        '⟨z|F|z⟩': [F.expectation(z.coords).real for z in zeros.values()],
    })
    return DemoResult(
        name='appendix-a',
        title='Product zeros of the flip on 2⊗2 and the full-rank separable state they build',
        tables={'zeros': zero_table, '16·ρ': _complex_frame(16 * rho.matrix)},
        facts={
            'rank': tensor_core.numerical_rank(rho.matrix),
            'tr(ρF)': float(np.trace(rho.matrix @ F.matrix).real),
            'matches reference': bool(np.allclose(16 * rho.matrix, FLIP_ZERO_STATE_16, atol=1e-12)),
        },
        verdicts=[verdict],
    )


def conjugate_trace_demo(config=None, dims=range(1, 7)):
    config = config or unitary_opt.OptimizerConfig()
    rows = []
    for n in dims:
        result = unitary_opt.minimize_conj_trace(n, config)
        rows.append({
            'n': n,
            'closed form': unitary_opt.conj_trace_minimum(n),
            'analytic minimizer': unitary_opt.conj_trace(unitary_opt.analytic_minimizer(n)),
            'numeric': result.best_value,
            'converged': result.converged,
        })
    table = pd.DataFrame(rows).set_index('n')
    return DemoResult(
        name='appendix-b',
        title='Minimum of tr(ŪU) over the unitary group',
        tables={'minima': table},
        facts={'max deviation': float(np.max(np.abs(table['numeric'] - table['closed form'])))},
    )


def robertson_trace_demo(config=None, blocks=(2, 3)):
    config = config or criteria.CriteriaConfig()
    rows, verdicts = [], []
    specs = [witnesses.robertson_witness('gen1', n) for n in blocks]
    specs.append(witnesses.robertson_witness('gen2', 4))
    for spec in specs:
        verdict = criteria.map_trace_optimality(spec.source_map, config=config)
        rows.append({
            'map': spec.name,
            'dimension': spec.source_map.dim_in,
            'trace': choi.superoperator_trace(spec.source_map),
            'expected': -spec.source_map.dim_in,
            'verdict': verdict.status.value,
        })
        verdicts.append(verdict)
    return DemoResult(
        name='appendix-c',
        title='Superoperator trace of the generalized Robertson maps',
        tables={'traces': pd.DataFrame(rows)},
        verdicts=verdicts,
    )


def weak_optimality_demo(config=None):
    """
    W = 1 on 2⊗2 with Ψ = tr(·)|0⟩⟨0|: zero eigenvalue of (id⊗Ψ)(W) but W is
    far from weakly optimal. W = F + |00⟩⟨00| goes the other way: no zero
    eigenvalue of W + tr₂(W)⊗1, yet a product zero exists.
    """
    config = config or criteria.CriteriaConfig()
    W = BipartiteOperator(2, 2, np.eye(4))
    channel = choi.trace_map_to(np.diag([1, 0]), 2)
    verdict = criteria.channel_weak_optimality(W, channel, entanglement_breaking_attested=True, config=config)
    zeros = criteria.collect_product_zeros(W, config=config)

    corner = tensor_core.basis_vector(0, 4)
    flip_plus = tensor_core.flip_operator(2) + np.outer(corner, corner)
    flip_plus_zeros = criteria.collect_product_zeros(flip_plus, config=config)
    return DemoResult(
        name='remark-weak',
        title='A zero eigenvalue alone does not give weak optimality',
        facts={
            'choi rank of Ψ': choi.channel_properties(channel).choi_rank,
            'seesaw minimum over product vectors': zeros.min_value,
            'F + |00⟩⟨00| seesaw minimum': flip_plus_zeros.min_value,
            'F + |00⟩⟨00| minimizer': ', '.join(_format_complex(c) for c in flip_plus_zeros.min_vector.coords),
        },
        verdicts=[verdict, criteria.weak_optimality_criterion(flip_plus, config)],
    )


DEMOS = {
    'appendix-a': product_zeros_demo,
    'appendix-b': conjugate_trace_demo,
    'appendix-c': robertson_trace_demo,
    'remark-weak': weak_optimality_demo,
}


def run_demo(name, criteria_config=None):
    if name not in DEMOS:
        raise ValidationError(f"unknown demo {name!r}; known demos: {', '.join(DEMOS)}")
    if name == 'appendix-b':
        optimizer = criteria_config.optimizer if criteria_config else None
        return conjugate_trace_demo(optimizer)
    return DEMOS[name](criteria_config)
