"""ASL-Sim - 能耗受限无线边缘网络中自适应切分学习的时隙仿真与调度优化"""

__version__ = "0.1.0"

from aslsim.core.base import Component
from aslsim.core.router import Router
