#!/usr/bin/env python
"""
ASL-Sim - 能耗受限无线边缘网络中的自适应切分学习仿真
主程序入口点，等价于 `aslsim` 命令。

示例:
    python main.py run --set run.episodes=10
    python main.py sweep --out results/sweep
    python main.py validate-profile lenet12
    python main.py compare results/open results/fixed-sl
"""
import sys

from aslsim.main import main

if __name__ == "__main__":
    sys.exit(main())
