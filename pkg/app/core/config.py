from pydantic_settings import BaseSettings
from typing import List, Optional


class Settings(BaseSettings):
    PROJECT_NAME: str = "OSCAIL Experimenter"
    VERSION: str = "1.0"
    API_V1_STR: str = "/api/v1"

    # CORS
    ALLOWED_ORIGINS: List[str] = [
        "http://localhost:3000",
        "http://localhost:8000",
        "http://127.0.0.1:8000",
    ]

    # Logging
    LOG_LEVEL: str = "INFO"

    # Output locations
    LOG_DIR: str = "./logs"
    MODEL_DIR: str = "./classifiers"
    DATA_DIR: str = "./data"

    # Experiment execution
    MAX_WORKERS: int = 1
    DEFAULT_NORMALIZATION: str = "per_instance"  # what "-N yes" means

    # Learners
    KMEANS_MAX_ITER: int = 100
    SVM_TOLERANCE: float = 1e-6
    SVM_MAX_PASSES: int = 10000
    SVM_DECISION_TOLERANCE: float = 1e-12

    # Multi-feature digits, profile correlations (216 features, 200 per digit)
    DIGITS_URL: str = "https://archive.ics.uci.edu/ml/machine-learning-databases/mfeat/mfeat-fac"
    HTTP_TIMEOUT: float = 60.0

    # Non-interactive CLI: one prompt answer per line
    PROMPT_ANSWERS_FILE: Optional[str] = None

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
