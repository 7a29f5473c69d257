"""
Configuration loader for the Confusion Profiler.
Handles loading and validation of the YAML configuration file with fallback to defaults.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml

from ..core.data_models import ValuationClass
from ..utils.error_handler import ConfigurationError
from ..utils.logger import get_logger

DEFAULT_SEED = 20240607
DEFAULT_ORDER: Tuple[ValuationClass, ...] = (
    ValuationClass.CO,
    ValuationClass.ANTI,
    ValuationClass.II,
    ValuationClass.ID,
)


@dataclass(frozen=True)
class SolverOptions:
    """Options of the multi-start optimizer and the permutation search."""
    restarts: int = 64
    max_iterations: int = 500
    convergence_tol: float = 1e-10
    seed: int = DEFAULT_SEED
    report_precision: int = 6
    n_jobs: int = 1
    include_step_starts: bool = True
    screen_restarts: int = 8
    refine_top: int = 3
    exhaustive_max_d: int = 7
    heuristic_restarts: int = 200

    def __post_init__(self):
        for name in ("restarts", "max_iterations", "screen_restarts", "refine_top",
                     "exhaustive_max_d", "heuristic_restarts"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1", value=getattr(self, name))
        if not self.convergence_tol > 0:
            raise ConfigurationError("convergence_tol must be > 0", value=self.convergence_tol)
        if self.report_precision < 0:
            raise ConfigurationError("report_precision must be >= 0", value=self.report_precision)
        if self.n_jobs == 0:
            raise ConfigurationError("n_jobs must be nonzero (use -1 for all cores)")

    def screening(self) -> "SolverOptions":
        """Cheaper variant used to rank permutations before refinement."""
        from dataclasses import replace
        return replace(self, restarts=min(self.restarts, self.screen_restarts), n_jobs=1)


@dataclass(frozen=True)
class McOptions:
    """Options of the Monte Carlo rejection oracle."""
    accepted_samples: int = 10**6
    seed: int = DEFAULT_SEED
    max_draws: int = 10**9
    batch_size: int = 8192
    n_workers: int = 1
    progress: bool = False

    def __post_init__(self):
        if self.accepted_samples < 1:
            raise ConfigurationError("accepted_samples must be >= 1", value=self.accepted_samples)
        if self.max_draws < self.accepted_samples:
            raise ConfigurationError("max_draws must be >= accepted_samples",
                                     max_draws=self.max_draws,
                                     accepted_samples=self.accepted_samples)
        if self.batch_size < 1 or self.n_workers < 1:
            raise ConfigurationError("batch_size and n_workers must be >= 1")


@dataclass(frozen=True)
class ComparatorConfig:
    """Options of the flowchart comparison."""
    epsilon: float = 1e-4
    order: Tuple[ValuationClass, ...] = field(default=DEFAULT_ORDER)

    def __post_init__(self):
        if self.epsilon < 0:
            raise ConfigurationError("epsilon must be >= 0", value=self.epsilon)
        if not self.order:
            raise ConfigurationError("comparison order must name at least one class")
        if len(set(self.order)) != len(self.order):
            raise ConfigurationError("comparison order must not repeat a class",
                                     order=",".join(c.value for c in self.order))


def parse_order(text: str) -> Tuple[ValuationClass, ...]:
    """Parse a comma-separated step order such as ``CO,ANTI,II,ID``."""
    try:
        return tuple(ValuationClass.parse(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ConfigurationError(str(e)) from None


class ConfigLoader:
    """
    Loads and validates the YAML configuration file.
    Provides fallback to default options when the file or a section is missing.
    """

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize ConfigLoader.

        Args:
            config_path: Configuration file. Defaults to solver_config.yml next to this module.
        """
        if config_path is None:
            self.config_path = Path(__file__).parent / "solver_config.yml"
        else:
            self.config_path = Path(config_path)

        self.logger = get_logger(__name__)
        self._document: Optional[Dict[str, Any]] = None

    def _load_section(self, section: str) -> Dict[str, Any]:
        if self._document is None:
            self._document = self._read_document()
        data = self._document.get(section)
        if data is None:
            self.logger.debug(f"No '{section}' section in {self.config_path}. Using defaults.")
            return {}
        if not isinstance(data, dict):
            self.logger.warning(f"Invalid '{section}' section in {self.config_path}. Using defaults.")
            return {}
        return data

    def _read_document(self) -> Dict[str, Any]:
        if not self.config_path.exists():
            self.logger.warning(f"Config file not found at {self.config_path}. Using default configuration.")
            return {}
        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                document = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Error parsing config file {self.config_path}: {e}") from e
        if document is None:
            return {}
        if not isinstance(document, dict):
            raise ConfigurationError(f"Config file {self.config_path} must hold a mapping")
        return document

    def load_solver_options(self) -> SolverOptions:
        """
        Load solver options from the ``solver`` section.

        Returns:
            SolverOptions with loaded or default values
        """
        data = self._load_section("solver")
        defaults = SolverOptions()
        return SolverOptions(
            restarts=self._validate_positive_int(data.get('restarts', defaults.restarts), 'restarts', defaults.restarts),
            max_iterations=self._validate_positive_int(data.get('max_iterations', defaults.max_iterations),
                                                       'max_iterations', defaults.max_iterations),
            convergence_tol=self._validate_positive_float(data.get('convergence_tol', defaults.convergence_tol),
                                                          'convergence_tol', defaults.convergence_tol),
            seed=self._validate_seed(data.get('seed', defaults.seed), defaults.seed),
            report_precision=self._validate_nonnegative_int(data.get('report_precision', defaults.report_precision),
                                                            'report_precision', defaults.report_precision),
            n_jobs=self._validate_n_jobs(data.get('n_jobs', defaults.n_jobs)),
            include_step_starts=bool(data.get('include_step_starts', defaults.include_step_starts)),
            screen_restarts=self._validate_positive_int(data.get('screen_restarts', defaults.screen_restarts),
                                                        'screen_restarts', defaults.screen_restarts),
            refine_top=self._validate_positive_int(data.get('refine_top', defaults.refine_top),
                                                   'refine_top', defaults.refine_top),
            exhaustive_max_d=self._validate_positive_int(data.get('exhaustive_max_d', defaults.exhaustive_max_d),
                                                         'exhaustive_max_d', defaults.exhaustive_max_d),
            heuristic_restarts=self._validate_positive_int(data.get('heuristic_restarts', defaults.heuristic_restarts),
                                                           'heuristic_restarts', defaults.heuristic_restarts),
        )

    def load_mc_options(self) -> McOptions:
        """
        Load Monte Carlo options from the ``monte_carlo`` section.

        Returns:
            McOptions with loaded or default values
        """
        data = self._load_section("monte_carlo")
        defaults = McOptions()
        accepted = self._validate_positive_int(data.get('accepted_samples', defaults.accepted_samples),
                                               'accepted_samples', defaults.accepted_samples)
        max_draws = self._validate_positive_int(data.get('max_draws', defaults.max_draws),
                                                'max_draws', defaults.max_draws)
        if max_draws < accepted:
            self.logger.warning(f"max_draws {max_draws} is below accepted_samples {accepted}. "
                                f"Using {accepted * 1000}.")
            max_draws = accepted * 1000
        return McOptions(
            accepted_samples=accepted,
            seed=self._validate_seed(data.get('seed', defaults.seed), defaults.seed),
            max_draws=max_draws,
            batch_size=self._validate_positive_int(data.get('batch_size', defaults.batch_size),
                                                   'batch_size', defaults.batch_size),
            n_workers=self._validate_positive_int(data.get('n_workers', defaults.n_workers),
                                                  'n_workers', defaults.n_workers),
            progress=bool(data.get('progress', defaults.progress)),
        )

    def load_comparator_config(self) -> ComparatorConfig:
        """
        Load comparison options from the ``comparator`` section.

        Returns:
            ComparatorConfig with loaded or default values
        """
        data = self._load_section("comparator")
        defaults = ComparatorConfig()
        epsilon = data.get('epsilon', defaults.epsilon)
        try:
            epsilon = float(epsilon)
            if epsilon < 0:
                raise ValueError
        except (TypeError, ValueError):
            self.logger.warning(f"Invalid epsilon: {epsilon}. Must be a nonnegative number. "
                                f"Using default: {defaults.epsilon}")
            epsilon = defaults.epsilon

        order = defaults.order
        raw_order = data.get('order')
        if raw_order is not None:
            text = raw_order if isinstance(raw_order, str) else ",".join(str(item) for item in raw_order)
            try:
                order = parse_order(text)
                ComparatorConfig(epsilon=epsilon, order=order)
            except ConfigurationError as e:
                self.logger.warning(f"Invalid comparison order: {e}. Using default order.")
                order = defaults.order
        return ComparatorConfig(epsilon=epsilon, order=order)

    def _validate_positive_int(self, value: Any, field_name: str, default: int) -> int:
        """
        Validate that a value is a positive integer.

        Args:
            value: Value to validate
            field_name: Name of the field for error messages
            default: Default value to use if validation fails

        Returns:
            Validated integer value or default
        """
        try:
            int_value = int(value)
            if int_value <= 0 or int_value != value:
                self.logger.warning(f"Invalid {field_name}: {value}. Must be a positive integer. Using default: {default}")
                return default
            return int_value
        except (ValueError, TypeError):
            self.logger.warning(f"Invalid {field_name}: {value}. Must be an integer. Using default: {default}")
            return default

    def _validate_nonnegative_int(self, value: Any, field_name: str, default: int) -> int:
        try:
            int_value = int(value)
            if int_value < 0 or int_value != value:
                self.logger.warning(f"Invalid {field_name}: {value}. Must be a nonnegative integer. Using default: {default}")
                return default
            return int_value
        except (ValueError, TypeError):
            self.logger.warning(f"Invalid {field_name}: {value}. Must be an integer. Using default: {default}")
            return default

    def _validate_positive_float(self, value: Any, field_name: str, default: float) -> float:
        try:
            float_value = float(value)
            if not float_value > 0:
                self.logger.warning(f"Invalid {field_name}: {value}. Must be positive. Using default: {default}")
                return default
            return float_value
        except (ValueError, TypeError):
            self.logger.warning(f"Invalid {field_name}: {value}. Must be a number. Using default: {default}")
            return default

    def _validate_seed(self, value: Any, default: int) -> int:
        try:
            seed = int(value)
            if not 0 <= seed < 2**64:
                raise ValueError
            return seed
        except (ValueError, TypeError):
            self.logger.warning(f"Invalid seed: {value}. Must be a 64-bit unsigned integer. Using default: {default}")
            return default

    def _validate_n_jobs(self, value: Any) -> int:
        try:
            n_jobs = int(value)
            if n_jobs == 0:
                raise ValueError
            return n_jobs
        except (ValueError, TypeError):
            self.logger.warning(f"Invalid n_jobs: {value}. Using default: 1")
            return 1
