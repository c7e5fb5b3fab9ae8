"""Pipeline configuration: one TOML file, with flag and env-var overrides.

Flags win over the file; LYRICVALUES_* environment variables win over
defaults (handled by the CLI layer). Relative paths are resolved against the
config file's directory.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .reliability import ALPHA_SIZES, POSTHOC_SIZES
from .sampler import DEFAULT_POPULARITY_QUANTILES

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - version-dependent
    import tomli as tomllib


@dataclass
class ModelSpec:
    name: str
    vectors: Path
    doc_vectors: Path | None = None


@dataclass
class PipelineConfig:
    config_dir: Path
    catalog: Path | None = None
    annotations: Path | None = None
    lexicon: Path | None = None
    reference_correlation: Path | None = None
    stopwords: Path | None = None
    screening_vocabulary: Path | None = None
    output_dir: Path = Path("out")

    # sampling
    sample_n: int | None = None
    sample_seed: int | None = None
    concentration: float | None = None
    target_min_share: float | None = 0.05
    popularity_quantiles: tuple[float, ...] = DEFAULT_POPULARITY_QUANTILES
    popularity_edges: tuple[float, ...] | None = None  # explicit cut points win

    # screening thresholds
    min_tokens: int = 20
    min_type_token_ratio: float = 0.10
    min_stopword_ratio: float = 0.05
    max_oov_ratio: float = 0.80

    # aggregation
    alpha: float = 0.05
    correction: str = "lists"

    # reliability
    reliability_seed: int | None = None
    reliability_sizes: tuple[int, ...] = ALPHA_SIZES
    reliability_replicates: int = 10
    reliability_threshold: float = 0.7
    posthoc_sizes: tuple[int, ...] = POSTHOC_SIZES
    posthoc_replicates: int = 100

    # scoring
    models: list[ModelSpec] = field(default_factory=list)

    # evaluation
    eval_mark: float = 0.10
    eval_strata: tuple[str, ...] = ()

    # mds
    mds_n_samples: int = 10000
    mds_seed: int | None = None

    raw: dict = field(default_factory=dict)

    def resolve(self, p) -> Path:
        path = Path(p)
        return path if path.is_absolute() else self.config_dir / path

    def require(self, attr: str) -> Path:
        value = getattr(self, attr)
        if value is None:
            raise ConfigError(f"config is missing required path '{attr}'")
        if not Path(value).exists():
            raise ConfigError(f"{attr} path does not exist: {value}")
        return Path(value)

    def digest(self) -> str:
        """Stable hash of the resolved configuration, for run manifests."""
        blob = json.dumps(self.raw, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from None

    cfg = PipelineConfig(config_dir=path.parent.resolve(), raw=data)
    paths = data.get("paths", {})
    for key, attr in (
        ("catalog", "catalog"),
        ("annotations", "annotations"),
        ("lexicon", "lexicon"),
        ("reference_correlation", "reference_correlation"),
        ("stopwords", "stopwords"),
        ("screening_vocabulary", "screening_vocabulary"),
    ):
        if key in paths:
            setattr(cfg, attr, cfg.resolve(paths[key]))
    if "output_dir" in paths:
        cfg.output_dir = cfg.resolve(paths["output_dir"])

    s = data.get("sampling", {})
    cfg.sample_n = s.get("n", cfg.sample_n)
    cfg.sample_seed = s.get("seed", cfg.sample_seed)
    cfg.concentration = s.get("concentration", cfg.concentration)
    cfg.target_min_share = s.get("target_min_share", cfg.target_min_share)
    if "popularity_quantiles" in s:
        cfg.popularity_quantiles = tuple(float(q) for q in s["popularity_quantiles"])
    if "popularity_edges" in s:
        cfg.popularity_edges = tuple(float(e) for e in s["popularity_edges"])

    sc = data.get("screening", {})
    cfg.min_tokens = sc.get("min_tokens", cfg.min_tokens)
    cfg.min_type_token_ratio = sc.get("min_type_token_ratio", cfg.min_type_token_ratio)
    cfg.min_stopword_ratio = sc.get("min_stopword_ratio", cfg.min_stopword_ratio)
    cfg.max_oov_ratio = sc.get("max_oov_ratio", cfg.max_oov_ratio)

    a = data.get("aggregation", {})
    cfg.alpha = a.get("alpha", cfg.alpha)
    cfg.correction = a.get("correction", cfg.correction)
    if cfg.correction not in ("lists", "items"):
        raise ConfigError("aggregation.correction must be 'lists' or 'items'")

    r = data.get("reliability", {})
    cfg.reliability_seed = r.get("seed", cfg.reliability_seed)
    if "sizes" in r:
        cfg.reliability_sizes = tuple(int(x) for x in r["sizes"])
    cfg.reliability_replicates = r.get("replicates", cfg.reliability_replicates)
    cfg.reliability_threshold = r.get("threshold", cfg.reliability_threshold)
    if "posthoc_sizes" in r:
        cfg.posthoc_sizes = tuple(int(x) for x in r["posthoc_sizes"])
    cfg.posthoc_replicates = r.get("posthoc_replicates", cfg.posthoc_replicates)

    for name, entry in data.get("scoring", {}).get("models", {}).items():
        if isinstance(entry, str):
            cfg.models.append(ModelSpec(name=name, vectors=cfg.resolve(entry)))
        else:
            if "vectors" not in entry:
                raise ConfigError(f"model '{name}' needs a 'vectors' path")
            cfg.models.append(ModelSpec(
                name=name,
                vectors=cfg.resolve(entry["vectors"]),
                doc_vectors=cfg.resolve(entry["doc_vectors"])
                if "doc_vectors" in entry else None,
            ))

    e = data.get("evaluation", {})
    cfg.eval_mark = e.get("mark", cfg.eval_mark)
    if "strata" in e:
        cfg.eval_strata = tuple(e["strata"])

    m = data.get("mds", {})
    cfg.mds_n_samples = m.get("n_samples", cfg.mds_n_samples)
    cfg.mds_seed = m.get("seed", cfg.mds_seed)
    return cfg
