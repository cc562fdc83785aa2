"""
Environment configuration for the SXI++ pipeline
Loads process-level settings from the .env file; pipeline parameters live in pipeline/config.py
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Logging Configuration
LOG_LEVEL = os.getenv("SXI_LOG_LEVEL", "INFO").upper()
LOG_FILE = os.getenv("SXI_LOG_FILE", "sxi_pipeline.log")

# Reproducibility
DEFAULT_SEED = int(os.getenv("SXI_SEED", "42"))

# Parallelism for learners, folds, forest trees and bootstrap resamples
WORKERS = int(os.getenv("SXI_WORKERS", "1"))
if WORKERS < 1:
    raise ValueError("SXI_WORKERS must be >= 1")

# Where CLI commands put reports when no explicit path is given
REPORT_DIR = os.getenv("SXI_REPORT_DIR", ".")

# Model artifact format
ARTIFACT_SCHEMA_VERSION = 1

# Tokens read as missing cells in CSV input (compared case-insensitively)
MISSING_TOKENS = frozenset({"", "na", "nan"})

# PhysioNet 2019 layout (Table 1 column order)
PHYSIONET_COLUMNS = [
    "Hour", "HR", "O2Sat", "Temp", "SBP", "MAP", "DBP", "Resp", "EtCO2",
    "BaseExcess", "HCO3", "FiO2", "pH", "PaCO2", "SaO2", "AST", "BUN",
    "Alkalinephos", "Calcium", "Chloride", "Creatinine", "Bilirubin_direct",
    "Glucose", "Lactate", "Magnesium", "Phosphate", "Potassium",
    "Bilirubin_total", "TroponinI", "Hct", "Hgb", "PTT", "WBC", "Fibrinogen",
    "Platelets", "Age", "Gender", "Unit1", "Unit2", "HospAdmTime", "ICULOS",
    "SepsisLabel", "Patient_ID",
]
TARGET_COLUMN = "SepsisLabel"
IDENTIFIER_COLUMN = "Patient_ID"

# Columns that survive the 40% missingness rule on the reference cohort
RETAINED_COLUMNS = [
    "Hour", "HR", "O2Sat", "SBP", "MAP", "DBP", "Resp", "Age", "HospAdmTime",
    "ICULOS", "SepsisLabel", "Patient_ID", "Gender_0", "Gender_1",
]
