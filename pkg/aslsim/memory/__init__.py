"""
虚拟队列：能耗亏空队列与漂移加惩罚目标。
"""
from aslsim.memory.base import Memory
from aslsim.memory.energy_queue import EnergyDeficitQueue, PenaltyConfig, QueueState
