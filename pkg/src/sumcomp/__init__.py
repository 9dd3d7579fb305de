"""SumComp: digital over-the-air computation with ring-of-integers coding."""
from .analytic import (
    ErrorModelInputs,
    ComplexityInputs,
    bops_decoder,
    bops_encoder,
    lambert_w0,
    mae_bound,
    mse_analytic,
    mse_zeta_oracle,
    nmse,
    q_function,
)
from .channel import ChannelConfig, sigma_from_snr, transmit_faded, transmit_mac, transmit_ofdma
from .codec import (
    Constellation,
    GridSubset,
    SumCompCode,
    build_code,
    constellation_energy,
    decode_received,
    decode_sum,
    denormalize,
    encode,
    encode_line,
    gray_pam4_baseline,
    hex_qam8_preset,
    pam_preset,
    preset_code,
    qam_preset,
    value_of,
)
from .errors import *  # noqa: F401,F403
from .nomographic import ModulusDescriptor, NomographicSpec, UniformQuantizer, dequantize, modulus_eval, preset, quantize_pre
from .ring import BezoutPair, GaussianInt, RingParams, RingPoint, extended_euclid, g_rho, g_rho_inverse, quantize_to_ring

__version__ = "0.1.0"
