"""HDC classification with evolutionary flip-budget hypervector design."""

__version__ = "0.1.0"

from .data import (
    Dataset,
    Quantizer,
    calibrate_quantizer,
    export_sample_hypervectors,
    generate_motivational,
    load_dataset_csv,
    load_model,
    quantize_value,
    save_dataset_csv,
    save_model,
)
from .errors import (
    ConstraintError,
    DataError,
    DimensionError,
    FormatError,
    HvError,
    ParseError,
    ShapeError,
)
from .evolve import (
    GAConfig,
    Individual,
    ParetoFront,
    dominates,
    evolve_generation,
    hypervolume,
    initialize_population,
    rank_population,
    repair,
    run_optimization,
)
from .hypervector import (
    FlipBudget,
    Hypervector,
    LevelTable,
    build_level_table,
    encode_quantized,
    encode_sample,
    level_vector,
    random_bipolar,
    repair_budget,
    uniform_flip_budget,
)
from .model import (
    Prediction,
    TrainedModel,
    appendix_experiment,
    classify,
    cosine_similarity,
    fit_baseline,
    predict_batch,
    train_encoders,
    train_model,
)
from .objectives import (
    CandidateEvaluator,
    ObjectiveScores,
    avg_similarity,
    confusion_matrix,
    evaluate_candidate,
    feasibility,
    pairwise_similarities,
    total_accuracy,
    weighted_accuracy,
)
