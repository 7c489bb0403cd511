"""Hypercomplex layer operations: weight synthesis, grouped normalization, initializers."""

try:
    from . import _core as _c  # installed wheel: extension inside the package
except ImportError:
    import _core as _c  # build tree: extension beside the package on PYTHONPATH

conv2d = _c.conv2d
hamilton = _c.hamilton
hyper_adain = _c.hyper_adain
hyper_instance_norm = _c.hyper_instance_norm
init_a = _c.init_a
kronecker = _c.kronecker
ph_compose_conv = _c.ph_compose_conv
ph_compose_matrix = _c.ph_compose_matrix
quaternion_conv_kernel = _c.quaternion_conv_kernel
to_model_channels = _c.to_model_channels
to_rgb_channels = _c.to_rgb_channels

__all__ = [
    "conv2d",
    "hamilton",
    "hyper_adain",
    "hyper_instance_norm",
    "init_a",
    "kronecker",
    "ph_compose_conv",
    "ph_compose_matrix",
    "quaternion_conv_kernel",
    "to_model_channels",
    "to_rgb_channels",
]
