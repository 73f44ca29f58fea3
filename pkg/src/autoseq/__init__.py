"""Decision and enumeration engine for k-automatic sequences.

Compile first-order predicates about automatic sequences into multi-track
base-k automata, decide them, and turn counting questions into exact
linear representations of k-regular sequences.
"""

from . import analyses, automata, logic, numeration, oracle, regseq, seqgen
from .analyses import (factor_set_compare, has_arbitrarily_large_unbordered,
                       has_unbounded_exponent, indicator,
                       linear_complexity_check, measure, permutation_order,
                       recurrence_flags, unbordered_characteristic)
from .automata import Dfa, Nfa
from .logic import CompileConfig, characteristic, compile, decide, parse
from .numeration import DigitWord, decode_lsd, encode_lsd, encode_tuple
from .regseq import (INF, LinRep, count_measure, count_parameter,
                     kernel_relations, representation_count, verify_relation)
from .seqgen import Dfao, prefix, thue_morse

__version__ = "0.1.0"
