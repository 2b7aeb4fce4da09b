from supframe.adapt.costs import SEGMENT_COSTS, SegmentCost, concentration, concentration_score, entropy_cost
from supframe.adapt.greedy import DEFAULT_R_MAX, GreedyResult, Proposal, greedy_adapt, greedy_search
from supframe.adapt.dynamic import DpResult, DpTable, dominance_sets, dp_adapt, dp_search, solve_prefix
