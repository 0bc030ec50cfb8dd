"""
Uygulama konfigürasyon ayarları
"""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Uygulama ayarları"""

    # Uygulama
    APP_NAME: str = "Matroid Phase"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # API
    API_HOST: str = "0.0.0.0"
    API_PORT: int = 8000
    API_PREFIX: str = "/api/v1"
    MAX_FILE_SIZE_MB: int = 10

    # Deneyler
    THREADS: int = 1  # sweep paralelliği (MATROIDPHASE_THREADS)
    DEFAULT_SEED: int = 0
    PROGRESS: bool = False
    WITNESS_SPOT_CHECK: float = 0.1

    # Minor arama
    FINDER_BUDGET: int = 200
    FINDER_RESHUFFLE_EVERY: int = 25
    BRUTEFORCE_MAX_COLUMNS: int = 12

    # Lineer cebir
    DENSIFY_DENSITY: float = 0.10
    DENSIFY_MAX_ROWS: int = 512
    DENSE_WARN_MB: int = 256  # bu boyun üstündeki yoğun ızgaralar için uyarı

    # Eşik çözücü
    THRESHOLD_GRID_STEP: float = 1e-4
    THRESHOLD_BRACKET_WIDTH: float = 1e-9

    # Pipeline
    PIPELINE_R: int = 8
    DENSE_WEIGHT_DELTA: float = 0.01  # ampirik kalibrasyon

    class Config:
        env_file = ".env"
        env_prefix = "MATROIDPHASE_"
        case_sensitive = True


# Global settings
settings = Settings()


def get_settings() -> Settings:
    """Settings instance'ını döndürür (dependency injection)"""
    return settings
