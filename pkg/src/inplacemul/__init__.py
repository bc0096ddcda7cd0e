"""In-place accumulating multiplication kernels over prime fields."""
from .bilinear import (HMRep, HMRep2, check_column_pairs, emit_apply_2x2, exact_counts_2d,
                       expand_mu, generate_inplace, generate_inplace_2d, karatsuba_rep,
                       karatsuba_rep2, oracle_bilinear, predicted_counts, predicted_counts_2d,
                       strassen_winograd_rep, toom3_rep, validate_hm)
from .errors import (InplaceError, NoSuchRoot, OverlappingViews, ParseError, RankDeficientPair,
                     ShapeMismatch, SingularBlock, UnsupportedCharacteristic, ZeroColumn,
                     ZeroInverse, ZeroRow)
from .field import FieldCtx, SkewUnitaryPair, find_principal_root, find_skew_unitary_pair
from .matmul import (apply_skew_unitary, mm_acc_classic, mm_acc_strassen, square_acc,
                     strassen_level_counts, syrk_acc)
from .polymul import (karatsuba_level_counts, pm_acc_classic, pm_acc_karatsuba,
                      pm_acc_toom3)
from .slp import (AddMul, MulAcc, MulAcc2, Program, RegRef, Scale, ScaleInv, Swap, count_ops,
                  execute, parse, render, verify_restoration)
from .tally import OpCounts, Tally
from .transform import (TwiddleCtx, bitrev, brdft, brdft_inverse, brtft, brtft_inverse,
                        fft_call_count, parttft, parttft_inv, pm_acc_fft, pm_acc_fft_pow2)

__version__ = "0.1.0"
