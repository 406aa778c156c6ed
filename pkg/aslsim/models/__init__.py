"""
时隙模型：模型profile、无线信道与时延/能耗。
"""
from aslsim.models.channel import ChannelDraw, RadioLink, draw, mean_gain, rate
from aslsim.models.cost import CostBreakdown, CostUnits, Decision, DeviceSpec, ServerSpec, average_metrics, evaluate
from aslsim.models.profile import LayerEntry, ModelProfile, load_profile
