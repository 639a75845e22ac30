from .special_fn import li2, lobachevsky, quantum_dilog, pochhammer_table
from .quantum_inv import colored_jones_root, rt_definitional, rt_lattice
from .potential import asymptotic_constants, potential, potential_finite, solve_critical
from .geometry import complex_volume, solve_gluing, volume_series
from .asymptotics import fit_kappa, predict_rt, verify_conjecture

__all__ = [
    'li2', 'lobachevsky', 'quantum_dilog', 'pochhammer_table',
    'colored_jones_root', 'rt_definitional', 'rt_lattice',
    'asymptotic_constants', 'potential', 'potential_finite', 'solve_critical',
    'complex_volume', 'solve_gluing', 'volume_series',
    'fit_kappa', 'predict_rt', 'verify_conjecture'
]
