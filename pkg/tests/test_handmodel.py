import numpy as np
import pytest

from graspforge.geometry.mesh import TriangleMesh
from graspforge.handmodel import (
    HandPose,
    PoseJacobian,
    forward_kinematics,
    joint_positions,
    load_hand_asset,
    pose_to_joint_angles,
    save_hand_asset,
    skin_vertices,
    thumb_tip_y,
)
from graspforge.rotations import aa_to_matrix


def random_pose(rng, tau_scale=0.05, phi_scale=0.5, theta_scale=0.3):
    return HandPose(
        tau=rng.normal(size=3) * tau_scale,
        phi=rng.normal(size=3) * phi_scale,
        theta=rng.normal(size=15) * theta_scale,
    )


class TestPoseToJointAngles:
    def test_zero_gives_mean(self, asset):
        np.testing.assert_array_equal(
            pose_to_joint_angles(asset, np.zeros(15)), asset.pose_mean
        )

    def test_unit_coefficient(self, asset):
        e1 = np.zeros(15)
        e1[0] = 1.0
        np.testing.assert_allclose(
            pose_to_joint_angles(asset, e1),
            asset.pose_mean + asset.pose_basis[:, 0],
            atol=0,
        )

    def test_linearity(self, asset):
        rng = np.random.default_rng(0)
        t1, t2 = rng.normal(size=15), rng.normal(size=15)
        f = lambda t: pose_to_joint_angles(asset, t)
        lhs = f(t1 + t2) - f(np.zeros(15))
        rhs = (f(t1) - f(np.zeros(15))) + (f(t2) - f(np.zeros(15)))
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


class TestForwardKinematics:
    def test_flat_pose_is_rest(self, asset):
        pose = HandPose.identity(theta=asset.theta_flat)
        joints = joint_positions(asset, pose)
        np.testing.assert_allclose(joints, asset.rest_joints, atol=1e-9)

    def test_translation_shifts_joints(self, asset):
        pose = HandPose(tau=np.array([0.1, 0.0, 0.0]), phi=np.zeros(3), theta=asset.theta_flat)
        joints = joint_positions(asset, pose)
        np.testing.assert_allclose(joints - asset.rest_joints, [[0.1, 0.0, 0.0]] * 16, atol=1e-12)

    def test_global_rotation(self, asset):
        phi = np.array([0.0, 0.0, np.pi / 2])
        pose = HandPose(tau=np.zeros(3), phi=phi, theta=asset.theta_flat)
        joints = joint_positions(asset, pose)
        expected = asset.rest_joints @ aa_to_matrix(phi).T
        np.testing.assert_allclose(joints, expected, atol=1e-9)

    def test_wrist_transform_is_global(self, asset):
        rng = np.random.default_rng(1)
        pose = random_pose(rng)
        transforms = forward_kinematics(asset, pose)
        np.testing.assert_allclose(transforms[0].rotation, aa_to_matrix(pose.phi), atol=1e-12)
        np.testing.assert_allclose(transforms[0].translation, pose.tau, atol=1e-12)


class TestSkinning:
    def test_flat_pose_is_template(self, asset):
        state = skin_vertices(asset, HandPose.identity(theta=asset.theta_flat))
        np.testing.assert_allclose(state.vertices, asset.template, atol=1e-9)

    def test_rigid_motion_preserves_distances(self, asset):
        rng = np.random.default_rng(2)
        theta = rng.normal(size=15) * 0.3
        base = skin_vertices(asset, HandPose(np.zeros(3), np.zeros(3), theta))
        moved = skin_vertices(
            asset, HandPose(rng.normal(size=3), rng.normal(size=3), theta)
        )
        ids = rng.integers(0, asset.num_vertices, size=(40, 2))
        d0 = np.linalg.norm(base.vertices[ids[:, 0]] - base.vertices[ids[:, 1]], axis=1)
        d1 = np.linalg.norm(moved.vertices[ids[:, 0]] - moved.vertices[ids[:, 1]], axis=1)
        np.testing.assert_allclose(d0, d1, atol=1e-9)

    def test_rigid_equivariance(self, asset):
        rng = np.random.default_rng(3)
        pose = random_pose(rng)
        rot_vec = rng.normal(size=3)
        t = rng.normal(size=3)
        rot = aa_to_matrix(rot_vec)
        state = skin_vertices(asset, pose)
        from graspforge.rotations import matrix_to_aa

        composed = HandPose(
            tau=rot @ pose.tau + t,
            phi=matrix_to_aa(rot @ aa_to_matrix(pose.phi)),
            theta=pose.theta,
        )
        state2 = skin_vertices(asset, composed)
        np.testing.assert_allclose(state2.vertices, state.vertices @ rot.T + t, atol=1e-9)
        np.testing.assert_allclose(state2.joints, state.joints @ rot.T + t, atol=1e-9)

    def test_landmarks(self, asset):
        state = skin_vertices(asset, HandPose.identity(theta=asset.theta_flat))
        np.testing.assert_allclose(
            state.fingertips, asset.template[asset.fingertip_vertices], atol=1e-9
        )
        assert np.linalg.norm(state.grasp_axis) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(state.heading) == pytest.approx(1.0, abs=1e-12)

    def test_axis_invariant_to_translation_equivariant_to_rotation(self, asset):
        rng = np.random.default_rng(4)
        theta = rng.normal(size=15) * 0.2
        s0 = skin_vertices(asset, HandPose(np.zeros(3), np.zeros(3), theta))
        s_t = skin_vertices(asset, HandPose(rng.normal(size=3), np.zeros(3), theta))
        np.testing.assert_allclose(s_t.grasp_axis, s0.grasp_axis, atol=1e-12)
        np.testing.assert_allclose(s_t.heading, s0.heading, atol=1e-12)
        phi = rng.normal(size=3)
        s_r = skin_vertices(asset, HandPose(np.zeros(3), phi, theta))
        rot = aa_to_matrix(phi)
        np.testing.assert_allclose(s_r.grasp_axis, rot @ s0.grasp_axis, atol=1e-9)
        np.testing.assert_allclose(s_r.heading, rot @ s0.heading, atol=1e-9)


class TestJacobian:
    def test_vertices_and_landmarks_match_finite_differences(self, asset):
        rng = np.random.default_rng(5)
        h = 1e-5
        for _ in range(20):
            pose = random_pose(rng)
            jac = PoseJacobian(asset, pose)
            vids = np.concatenate(
                [rng.integers(0, asset.num_vertices, size=50), asset.fingertip_vertices]
            )
            analytic = jac.vertex_jacobian(vids)
            params = pose.to_params()
            direction = rng.normal(size=21)
            direction /= np.linalg.norm(direction)
            vp = skin_vertices(asset, HandPose.from_params(params + h * direction)).vertices[vids]
            vm = skin_vertices(asset, HandPose.from_params(params - h * direction)).vertices[vids]
            fd = (vp - vm) / (2 * h)
            directional = np.einsum("nxp,p->nx", analytic, direction)
            scale = np.maximum(np.abs(fd), 1e-8)
            assert (np.abs(directional - fd) / scale).max() < 1e-4

    def test_wrist_jacobian(self, asset):
        rng = np.random.default_rng(6)
        pose = random_pose(rng)
        jac = PoseJacobian(asset, pose)
        h = 1e-6
        params = pose.to_params()
        analytic = jac.wrist_jacobian()
        for k in range(21):
            dp = np.zeros(21)
            dp[k] = h
            wp = joint_positions(asset, HandPose.from_params(params + dp))[0]
            wm = joint_positions(asset, HandPose.from_params(params - dp))[0]
            fd = (wp - wm) / (2 * h)
            np.testing.assert_allclose(analytic[:, k], fd, atol=1e-6)

    def test_jacobian_vertices_match_skinning(self, asset):
        rng = np.random.default_rng(7)
        pose = random_pose(rng)
        jac = PoseJacobian(asset, pose)
        ids = np.arange(asset.num_vertices)
        np.testing.assert_allclose(
            jac.vertices(ids), skin_vertices(asset, pose).vertices, atol=1e-12
        )
        np.testing.assert_allclose(
            jac.wrist_position(), skin_vertices(asset, pose).joints[0], atol=1e-12
        )


class TestThumbTipY:
    def test_flat_is_near_plane(self, asset):
        assert abs(thumb_tip_y(asset, asset.theta_flat)) < 0.01 * asset.hand_length()

    def test_decreases_along_opposition(self, asset):
        # Probe the basis for a coefficient that lowers the thumb tip.
        h = 1e-5
        grads = []
        for k in range(15):
            e = np.zeros(15)
            e[k] = h
            grads.append(
                (thumb_tip_y(asset, asset.theta_flat + e) - thumb_tip_y(asset, asset.theta_flat - e))
                / (2 * h)
            )
        k_best = int(np.argmin(grads))
        assert grads[k_best] < -1e-3
        step = np.zeros(15)
        step[k_best] = 0.2
        assert thumb_tip_y(asset, asset.theta_flat + step) < thumb_tip_y(asset, asset.theta_flat)

    def test_empirical_lipschitz(self, asset):
        rng = np.random.default_rng(8)
        thetas = [rng.normal(size=15) * 0.3 for _ in range(12)]
        # Bound the gradient norm over sampled poses, then check fresh pairs.
        h = 1e-6
        grad_norms = []
        for theta in thetas:
            g = np.array(
                [
                    (thumb_tip_y(asset, theta + h * e) - thumb_tip_y(asset, theta - h * e)) / (2 * h)
                    for e in np.eye(15)
                ]
            )
            grad_norms.append(np.linalg.norm(g))
        bound = 1.5 * max(grad_norms)
        for theta in thetas[:6]:
            delta = rng.normal(size=15) * 1e-3
            df = abs(thumb_tip_y(asset, theta + delta) - thumb_tip_y(asset, theta))
            assert df <= bound * np.linalg.norm(delta)


class TestTestAsset:
    def test_invariants(self, asset):
        asset.validate()
        sums = asset.weights.sum(axis=1)
        assert np.abs(sums - 1.0).max() < 1e-6
        assert (asset.weights >= 0).all()

    def test_flat_hand_in_xz_plane(self, asset):
        palm = np.abs(asset.template[:, 0]) <= 0.0421
        palm &= asset.template[:, 2] <= 0.0721
        palm &= np.abs(asset.template[:, 1]) <= 0.0121
        assert np.abs(asset.template[palm][:, 1]).max() <= 0.01 * asset.hand_length() + 0.0121
        # Palm thickness is symmetric about the plane itself.
        assert abs(asset.template[palm][:, 1].mean()) < 1e-3

    def test_hand_length_human_scale(self, asset):
        assert abs(asset.hand_length() - 0.18) < 0.01

    def test_watertight_surface(self, asset):
        mesh = TriangleMesh.from_arrays(asset.template, asset.faces)
        assert mesh.watertight

    def test_deterministic(self, asset):
        from graspforge.handmodel import build_test_asset

        again = build_test_asset()
        assert np.array_equal(again.template, asset.template)
        assert np.array_equal(again.pose_basis, asset.pose_basis)
        assert np.array_equal(again.contact_vertices, asset.contact_vertices)

    def test_basis_rank(self, asset):
        assert np.linalg.matrix_rank(asset.pose_basis) == 15

    def test_container_round_trip(self, asset, tmp_path):
        path = tmp_path / "hand.json"
        save_hand_asset(asset, path)
        loaded = load_hand_asset(path)
        np.testing.assert_array_equal(loaded.template, asset.template)
        np.testing.assert_array_equal(loaded.weights, asset.weights)
        np.testing.assert_array_equal(loaded.pose_basis, asset.pose_basis)
        np.testing.assert_array_equal(loaded.theta_flat, asset.theta_flat)
        assert loaded.chirality == asset.chirality

    def test_container_rejects_bad_format(self, tmp_path):
        from graspforge.errors import ParseError

        path = tmp_path / "bad.json"
        path.write_text('{"format": "other"}')
        with pytest.raises(ParseError):
            load_hand_asset(path)

    def test_converter_stub(self):
        from graspforge.handmodel import convert_mano_model

        with pytest.raises(NotImplementedError):
            convert_mano_model("model.pkl", "out.json")
