"""Dependence and independence reasoning over memory kernels.

Two concrete models (exact-rational Markov kernels and nondeterministic
powerset kernels), a formula language with basic and enriched dependence
atoms, a Hilbert-style proof checker, conditional-independence and
join-dependence analyses, and a verified program logic for a small
probabilistic language, all sharing one satisfaction checker.
"""

__version__ = "0.1.0"
