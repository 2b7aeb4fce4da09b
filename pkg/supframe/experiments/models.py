"""Configuration and report models for denoising experiments."""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from supframe.adapt.greedy import DEFAULT_R_MAX

DEFAULT_LENGTH = 2048
GAIN_CEILING_DB = 300.0
NOISE_GENERATOR = "numpy.random.PCG64 standard_normal (ziggurat)"


class WindowSpec(BaseModel):
    name: Literal["hamming", "hann", "triangular", "rect"] = "hamming"
    winlen: int = Field(64, ge=1)
    hop: int = Field(32, ge=1)
    periodic: bool = False
    modulations: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def hop_within_window(self):
        if self.hop > self.winlen:
            raise ValueError(f"hop {self.hop} exceeds window length {self.winlen}; translates would not cover")
        return self

    @property
    def M(self) -> int:
        return self.modulations or self.winlen


class Tone(BaseModel):
    amplitude: float = Field(..., ge=0)
    frequency: float = Field(..., ge=0, le=0.5, description="cycles per sample")
    phase: float = 0.0
    start: int = Field(0, ge=0)
    length: Optional[int] = Field(None, ge=1)


class Bump(BaseModel):
    amplitude: float = Field(..., ge=0)
    center: int = Field(..., ge=0)
    width: int = Field(..., ge=2)


class SyntheticSpec(BaseModel):
    """Test signal: a global tone, a time-limited tone, two impulses and a smooth bump.

    Defaults describe a 2048-sample layout; they are chosen to reproduce the
    qualitative shape of the classic adaptive-STFT demonstration signal.
    """

    global_tone: Optional[Tone] = Tone(amplitude=0.1, frequency=0.0112)
    local_tone: Optional[Tone] = Tone(amplitude=1.0, frequency=0.0937, start=192, length=832)
    impulses: List[int] = [1400, 1650]
    impulse_amplitude: float = Field(1.0, ge=0)
    bump: Optional[Bump] = Bump(amplitude=0.8, center=1880, width=160)


class MethodSpec(BaseModel):
    name: str = Field(..., min_length=1)
    kind: Literal["greedy", "dp", "fixed"]
    window: WindowSpec = WindowSpec()
    r_max: int = Field(DEFAULT_R_MAX, ge=0)
    reset: Literal["restart", "skip"] = "restart"


def default_methods() -> List[MethodSpec]:
    methods = [
        MethodSpec(name="greedy", kind="greedy", window=WindowSpec(winlen=64, hop=32)),
        MethodSpec(name="dp", kind="dp", window=WindowSpec(winlen=64, hop=32)),
    ]
    for winlen in (16, 32, 64, 128, 256, 512):
        methods.append(
            MethodSpec(name=f"fixed-{winlen}", kind="fixed", window=WindowSpec(winlen=winlen, hop=winlen // 2))
        )
    return methods


class ExperimentConfig(BaseModel):
    length: int = Field(DEFAULT_LENGTH, ge=8)
    signal: SyntheticSpec = SyntheticSpec()
    snr_db: List[Optional[float]] = Field(default_factory=lambda: [10.0], min_length=1)
    rules: List[Literal["oracle", "two-stage"]] = Field(
        default_factory=lambda: ["oracle", "two-stage"], min_length=1
    )
    trials: int = Field(50, ge=1)
    seed: int = Field(0, ge=0, lt=2 ** 63)
    methods: List[MethodSpec] = Field(default_factory=default_methods, min_length=1)

    @field_validator("methods")
    @classmethod
    def unique_method_names(cls, v):
        names = [m.name for m in v]
        if len(set(names)) != len(names):
            raise ValueError("method names must be unique")
        return v

    @model_validator(mode="after")
    def windows_fit_signal(self):
        for method in self.methods:
            w = method.window
            if w.winlen > self.length:
                raise ValueError(f"method {method.name}: window length {w.winlen} exceeds L={self.length}")
            if self.length % w.hop:
                raise ValueError(f"method {method.name}: hop {w.hop} does not divide L={self.length}")
        return self


class MethodResult(BaseModel):
    method: str
    kind: str
    snr_db: Optional[float]
    rule: str
    mean_gain_db: float
    std_gain_db: float
    gains_db: List[float]
    structure_fraction: Optional[float] = None
    mean_pieces: float


class ExperimentReport(BaseModel):
    config: ExperimentConfig
    noise_generator: str = NOISE_GENERATOR
    gain_ceiling_db: float = GAIN_CEILING_DB
    trials: int
    results: List[MethodResult]
    payload_hash: Optional[str] = None
