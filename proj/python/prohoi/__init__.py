"""Humanoid object-interaction planning and evaluation toolkit."""

import json as _json

from _prohoi import (  # noqa: F401
    DropMonitor,
    Pose,
    PriorLibrary,
    RetrievalWeights,
    SafetyRegion,
    SdfField,
    TwinParams,
    VelocityLimits,
    angular_distance,
    box_sdf,
    build_sequence,
    decode_rot6d,
    encode_rot6d,
    generate_ood_grid,
    interpolate_pose,
    interpolate_trajectory,
    predict_resting_pose,
    run_pipeline_json,
    voxel_downsample,
    yaw_of,
)

__all__ = [
    "DropMonitor",
    "Pose",
    "PriorLibrary",
    "RetrievalWeights",
    "SafetyRegion",
    "SdfField",
    "TwinParams",
    "VelocityLimits",
    "angular_distance",
    "box_sdf",
    "build_sequence",
    "decode_rot6d",
    "encode_rot6d",
    "generate_ood_grid",
    "interpolate_pose",
    "interpolate_trajectory",
    "predict_resting_pose",
    "run_pipeline",
    "voxel_downsample",
    "yaw_of",
]


def run_pipeline(object_pose, target_position, seed=0, disturbance_frame=-1):
    """End-to-end scenario run; returns the stage report as a dict."""
    return _json.loads(
        run_pipeline_json(object_pose, target_position, seed, disturbance_frame)
    )
