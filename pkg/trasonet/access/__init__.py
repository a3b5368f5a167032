from .engine import AccessEngine
from .fuzzy import evaluate_candidate, fuzzify_speed, infer
from .handover import adapt_trust, decide_handover, improvement_streak
from .knowledge import KnowledgeBase, speed_level, update_knowledge
from .models import EngineState, FuzzyInputs, FuzzyRule, KnowledgeRecord, Rulebase, SpeedLevel
from .rulebase import DEFAULT_RULEBASE_PATH, load_rulebase
