"""
工作流：单次仿真运行与多配置对比。
"""
from aslsim.workflows.base import Workflow
from aslsim.workflows.simulation import SimulationResult, SimulationWorkflow, build_population, run
from aslsim.workflows.sweep import compare_summaries, sweep
