"""核心系统组件"""

from aslsim.core.base import Component
from aslsim.core.router import Router
